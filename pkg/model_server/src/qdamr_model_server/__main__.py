import sys

from qdamr_model_server.cli import main

if __name__ == "__main__":
    sys.exit(main())
