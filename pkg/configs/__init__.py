from configs.config import *
