import logging
import sys

from config import Config
from cli import main

if __name__ == "__main__":
    logging.basicConfig(stream=sys.stderr, level=Config.LOG_LEVEL,
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')
    sys.exit(main())
