"""
freeprod - local statistics of word-random permutations over free products.

    python run.py analyze -g C2*C2 -w abab      # any CLI command
    python run.py serve [--port 5000]            # JSON API on Flask's dev server

In production serve the API with gunicorn: gunicorn "freeprod:create_app()".
"""

import os
import sys
import warnings

warnings.filterwarnings('ignore', category=DeprecationWarning)
os.environ['PYTHONDONTWRITEBYTECODE'] = '1'


def serve(argv):
    """Run the JSON API with a startup banner on stderr."""
    import argparse

    from dotenv import load_dotenv

    base_dir = os.path.dirname(os.path.abspath(__file__))
    load_dotenv(os.path.join(base_dir, '.env'))

    parser = argparse.ArgumentParser(prog='run.py serve')
    parser.add_argument('--host', default='127.0.0.1')
    parser.add_argument('--port', type=int, default=int(os.environ.get('PORT', 5000)))
    args = parser.parse_args(argv)

    from freeprod import __version__, create_app
    from freeprod.config import get_config

    config_class = get_config()
    app = create_app(config_class)

    banner = sys.stderr
    print(file=banner)
    print("=" * 60, file=banner)
    print(f"    freeprod {__version__} - word statistics over free products", file=banner)
    print("=" * 60, file=banner)
    print(f"  Config:       {config_class.__name__}", file=banner)
    print(f"  Merge budget: {config_class.MERGE_BUDGET}", file=banner)
    print(f"  Hom cap:      {config_class.HOM_CAP}", file=banner)
    print("-" * 60, file=banner)
    print(f"    API at: http://{args.host}:{args.port}/api/health", file=banner)
    print("    Press Ctrl+C to stop", file=banner)
    print("-" * 60, file=banner)
    print(file=banner)

    app.run(host=args.host, port=args.port, debug=app.config.get('DEBUG', False))
    return 0


def main():
    argv = sys.argv[1:]
    if argv and argv[0] == 'serve':
        return serve(argv[1:])

    from freeprod.cli import main as cli_main
    return cli_main(argv)


if __name__ == '__main__':
    sys.exit(main())
