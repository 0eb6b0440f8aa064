"""radbench: desk-scale radiomics workbench.

Volumetric ROI annotation, 1223-feature radiomic extraction, and DAG
experiment pipelines behind an HTTP service.
"""

__version__ = "0.1.0"
