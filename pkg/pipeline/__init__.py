from pipeline.sources import *
from pipeline.pipeline import *
from pipeline.synthetic import *
