"""Allow running riccatikit as `python -m riccatikit`."""

from riccatikit.cli import main

if __name__ == "__main__":
    main()
