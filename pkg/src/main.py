from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import uvicorn
from src.config import settings
from src.routes import news_routes, pipeline_routes
from src.utils.exceptions import NewsbotException, StageError
from src.utils.logger import setup_logger

# Initialize logger
logger = setup_logger()

# Initialize FastAPI app
app = FastAPI(
    title=settings.APP_NAME,
    description="Generates, summarizes and translates match reports and animates a talking head for them.",
    version="1.0.0"
)

# Middleware setup
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # Adjust this for production to restrict origins
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Exception handlers
@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException):
    logger.error(f"HTTP Exception: {exc.detail}")
    return JSONResponse(
        status_code=exc.status_code,
        content={"message": exc.detail},
    )

@app.exception_handler(NewsbotException)
async def newsbot_exception_handler(request: Request, exc: NewsbotException):
    logger.error(f"{type(exc).__name__}: {exc}")
    content = {"message": str(exc), "error": type(exc).__name__}
    if isinstance(exc, StageError):
        content["stage"] = exc.stage
    return JSONResponse(status_code=422, content=content)

@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"Unhandled Exception: {str(exc)}")
    return JSONResponse(
        status_code=500,
        content={"message": "An unexpected error occurred. Please try again later."},
    )

# Include routes
app.include_router(news_routes.router, prefix="/news", tags=["News"])
app.include_router(pipeline_routes.router, prefix="/pipeline", tags=["Pipeline"])

# Root endpoint
@app.get("/")
async def root():
    return {"message": f"Welcome to the {settings.APP_NAME} API!"}

# Run the server
if __name__ == "__main__":
    uvicorn.run(app, host="0.0.0.0", port=8000)
