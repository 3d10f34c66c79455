from dataio.documents import *
from dataio.summary import *
