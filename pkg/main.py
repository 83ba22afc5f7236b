"""Entry point for the triphase CLI application."""

import sys

from triphase.cli import main

if __name__ == '__main__':
  sys.exit(main())
