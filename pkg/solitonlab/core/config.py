from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    APP_NAME: str = "solitonlab"
    LOG_LEVEL: str = "INFO"

    # Ground-state cache: index database + checkpoint directory
    DATABASE_URL: str = "sqlite:///./data/solitonlab.db"
    CACHE_DIR: str = "./data/ground_states"

    # Runs
    OUTPUT_DIR: str = "./runs"
    FFT_WORKERS: int = 1
    DEFAULT_SEED: int = 12345

    model_config = SettingsConfigDict(env_file=".env", env_prefix="SOLITONLAB_", extra="ignore")


settings = Settings()
