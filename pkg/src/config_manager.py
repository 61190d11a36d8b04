"""Configuration manager for the triangle composition toolkit."""

import json
import logging
import shutil
from pathlib import Path
from typing import Optional

from .models import ToolSettings

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class ConfigManager:
    """Manages tool settings and their persistence."""

    def __init__(self, config_dir: str = "./config"):
        self.config_dir = Path(config_dir)
        self.config_file = self.config_dir / "settings.json"
        self.backup_file = self.config_dir / "settings_backup.json"
        self.logger = logging.getLogger(__name__)

        self._default_settings = ToolSettings()

    def load_settings(self) -> ToolSettings:
        """Load settings from the configuration file, falling back to defaults."""
        try:
            if self.config_file.exists():
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    settings = ToolSettings.from_dict(json.load(f))
                if not self.validate_settings(settings):
                    self.logger.warning("Settings out of range, using defaults")
                    return ToolSettings()
                self.logger.debug(f"Settings loaded from {self.config_file}")
                return settings
            self.logger.debug("No config file found, using default settings")
            return ToolSettings()
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as e:
            self.logger.error(f"Error loading settings: {e}")
            self.logger.info("Using default settings")
            return ToolSettings()
        except OSError as e:
            self.logger.error(f"Could not read {self.config_file}: {e}")
            return ToolSettings()

    def save_settings(self, settings: ToolSettings) -> bool:
        """Save settings to the configuration file."""
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(settings.to_dict(), f, indent=4)
            self.logger.info("Settings saved successfully")
            return True
        except Exception as e:
            self.logger.error(f"Error saving settings: {e}")
            return False

    def reset_to_defaults(self) -> ToolSettings:
        """Reset settings to default values and save."""
        default_settings = ToolSettings()
        self.save_settings(default_settings)
        self.logger.info("Settings reset to defaults")
        return default_settings

    def validate_settings(self, settings: ToolSettings) -> bool:
        """Validate settings values are within acceptable ranges."""
        # Exhaustive search is factorial in the degree
        if not (1 <= settings.backtrack_degree_cap <= 12):
            self.logger.warning("Invalid backtrack degree cap")
            return False

        if not (1 <= settings.default_budget <= 10_000_000):
            self.logger.warning("Invalid search budget")
            return False

        if settings.default_seed < 0:
            self.logger.warning("Invalid seed")
            return False

        if settings.default_k < 1:
            self.logger.warning("Invalid handle exponent")
            return False

        if not (1 <= settings.sweep_workers <= 64):
            self.logger.warning("Invalid worker count")
            return False

        if settings.log_level not in LOG_LEVELS:
            self.logger.warning("Invalid log level")
            return False

        return True

    def get_output_path(self, settings: ToolSettings) -> Path:
        """Get the directory for run outputs and manifests."""
        output_path = Path(settings.output_dir)
        if not output_path.is_absolute():
            output_path = Path.cwd() / output_path
        output_path.mkdir(parents=True, exist_ok=True)
        return output_path

    def create_backup(self) -> bool:
        """Create a backup of current settings."""
        try:
            if self.config_file.exists():
                shutil.copy2(self.config_file, self.backup_file)
                self.logger.info("Settings backup created")
                return True
            return False
        except Exception as e:
            self.logger.error(f"Error creating backup: {e}")
            return False

    def restore_backup(self) -> Optional[ToolSettings]:
        """Restore settings from backup."""
        try:
            if self.backup_file.exists():
                shutil.copy2(self.backup_file, self.config_file)
                self.logger.info("Settings restored from backup")
                return self.load_settings()
            return None
        except Exception as e:
            self.logger.error(f"Error restoring backup: {e}")
            return None
