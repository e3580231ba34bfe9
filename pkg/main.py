from dotenv import load_dotenv, find_dotenv
load_dotenv(find_dotenv())  # carga .env antes de tocar settings

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from app.core.config import settings
from app.core.errors import ThreadStatsError
from app.core.logs import setup_logging
from app.routers import health, datasets, distributions, clusters, correlations

setup_logging(settings.LOG_LEVEL)

app = FastAPI(title="Threadmood API")


app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

@app.exception_handler(ThreadStatsError)
async def thread_stats_error(request: Request, exc: ThreadStatsError):
    # errores de datos/parámetros -> JSON con el status propio de cada error
    return JSONResponse(status_code=exc.status_code, content={"detail": str(exc), "error": type(exc).__name__})

app.include_router(health.router)
app.include_router(datasets.router, prefix="", tags=["datasets"])
app.include_router(distributions.router, prefix="", tags=["distributions"])
app.include_router(clusters.router, prefix="", tags=["clusters"])
app.include_router(correlations.router, prefix="", tags=["correlations"])

# uvicorn main:app --reload --port 8080
