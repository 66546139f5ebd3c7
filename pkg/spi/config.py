from pydantic.v1 import BaseSettings


class Settings(BaseSettings):
    T_FACTOR: float = 10.0
    FOURIER_TOLERANCE: float = 1e-9
    NORM_TOLERANCE: float = 1e-12
    THINNING_EPSILON: float = 0.5
    DIRECT_TRANSFORM_MAX_K: int = 8
    DENSE_REFERENCE_MAX_N2: int = 10_000
    SWEEP_WORKERS: int = 1
    LOG_LEVEL: str = "INFO"
    CSV_FLOAT_FORMAT: str = "%.6f"

    class Config:
        env_file = ".env"
        env_prefix = "SPI_"


settings = Settings()
