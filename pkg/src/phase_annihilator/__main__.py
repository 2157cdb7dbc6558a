"""
Main entry point for Phase Annihilator
"""

from .cli import main

if __name__ == "__main__":
    main()
