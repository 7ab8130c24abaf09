from homalgebroid.cli import cli


def main():
    """Command-line entry point (python main.py check data/examples/rank2_affine.json)."""
    cli(obj={})


if __name__ == "__main__":
    main()
