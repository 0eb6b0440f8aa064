from .app import create_app
from .jobs import ExtractionQueue, Job
from .stores import Workspace, roi_content_id

__all__ = ["create_app", "ExtractionQueue", "Job", "Workspace", "roi_content_id"]
