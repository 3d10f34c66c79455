from detection.boxes import *
from detection.griddecode import *
