from .app import create_app
from .runs import RunManager, queries_from_ledger
from .store import ProjectStore
from .views import get_topic_view

__all__ = ["create_app", "RunManager", "queries_from_ledger", "ProjectStore",
           "get_topic_view"]
