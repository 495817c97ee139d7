import sys

from chi_index.cli import main

if __name__ == "__main__":
    sys.exit(main())
