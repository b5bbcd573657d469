import sys

from kg_currents.app.runner import run


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
