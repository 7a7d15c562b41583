"""
Sample workspace generator for Derived Chronicles
Run this script to write the worked-example workspaces into data/
"""

import logging
import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DATA_DIR = "data"


def create_sample_data(directory=DATA_DIR):
    """
    Write the two-loop, truncated polynomial and A2 tilt workspaces

    Returns:
        list: paths written
    """
    from models.equivalence import example_apr_tilt, example_nakayama, example_two_loop
    from utils.workspace import save_workspace

    os.makedirs(directory, exist_ok=True)
    bundles = {
        "two_loop.ws": lambda: example_two_loop(2, 2),
        "nakayama3.ws": lambda: example_nakayama(3, 1),
        "apr_tilt.ws": example_apr_tilt,
    }
    written = []
    for filename, build in bundles.items():
        path = os.path.join(directory, filename)
        try:
            save_workspace(build(), path)
            written.append(path)
            logger.info(f"Wrote sample workspace {path}")
        except Exception as e:
            logger.error(f"Failed to write sample workspace {path}: {str(e)}")
    return written


if __name__ == "__main__":
    create_sample_data()
