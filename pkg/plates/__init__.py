from plates.arrangement import *
from plates.formatrules import *
from plates.evaluation import *
