#! /usr/bin/python3
"""
Main run file for the quadratic semigroup analyzer
"""
import sys

from src.app.quadsemi_main import main

if __name__ == "__main__":
    sys.exit(main())
