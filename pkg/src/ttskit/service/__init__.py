from .store import Campaign, CampaignConfig, CampaignStore, ClipRef, Group
from .app import create_app, load_service_config, serve

__all__ = [
    "Campaign",
    "CampaignConfig",
    "CampaignStore",
    "ClipRef",
    "Group",
    "create_app",
    "load_service_config",
    "serve",
]
