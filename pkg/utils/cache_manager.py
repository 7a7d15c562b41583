"""
Cache Manager - Derived Chronicles

This module provides caching for the dashboard: workspace files are read
once per TTL, example bundles are built once per parameter set, and each
session keeps its own working copy that commands may extend.
"""

import glob
import logging
import os
from typing import Dict, List, Optional

import pandas as pd
import streamlit as st

from utils.errors import ChroniclesError
from utils.workspace import WORKSPACE_SUFFIX, Workspace, parse_workspace, serialize_workspace

logger = logging.getLogger(__name__)

DATA_DIR = "data"
CACHE_TTL = 3600  # workspace files change rarely
LONG_CACHE_TTL = 7200  # example bundles never change for fixed parameters
SESSION_KEY = "working_workspaces"


def list_workspace_files() -> List[str]:
    """Workspace files under the data directory, sorted by name"""
    return sorted(glob.glob(os.path.join(DATA_DIR, f"*{WORKSPACE_SUFFIX}")))


@st.cache_data(ttl=CACHE_TTL)
def get_cached_workspace_text(path: str) -> str:
    """
    Read a workspace file

    Args:
        path: path of the workspace file

    Returns:
        str: its text, or "" when it cannot be read
    """
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
        logger.info(f"Cached workspace text from {path}")
        return text
    except OSError as e:
        logger.error(f"Failed to read workspace {path}: {str(e)}")
        return ""


@st.cache_resource(ttl=CACHE_TTL)
def get_cached_workspace(path: str) -> Optional[Workspace]:
    """
    Parse a workspace file once per TTL

    Returns:
        Workspace or None: None when the file does not parse
    """
    try:
        ws = parse_workspace(get_cached_workspace_text(path))
        logger.info(f"Workspace {path} cached with {len(ws)} objects")
        return ws
    except ChroniclesError as e:
        logger.error(f"Failed to load workspace {path}: {str(e)}")
        return None


@st.cache_data(ttl=CACHE_TTL)
def get_cached_summary(path: str) -> pd.DataFrame:
    ws = get_cached_workspace(path)
    if ws is None:
        return pd.DataFrame(columns=["name", "kind", "description"])
    return ws.summary()


@st.cache_resource(ttl=LONG_CACHE_TTL)
def get_cached_example(which: str, first: int, second: int) -> Optional[Workspace]:
    """
    Build an example workspace

    Args:
        which: "two-loop" (first = n, second = s), "nakayama" (first = n, second = r)
            or "apr-tilt" (parameters ignored)

    Returns:
        Workspace or None: None when the parameters are rejected
    """
    from models.equivalence import example_apr_tilt, example_nakayama, example_two_loop

    try:
        if which == "two-loop":
            ws = example_two_loop(first, second)
        elif which == "nakayama":
            ws = example_nakayama(first, second)
        else:
            ws = example_apr_tilt()
        logger.info(f"Example {which} cached with {len(ws)} objects")
        return ws
    except ChroniclesError as e:
        logger.error(f"Failed to build example {which}: {str(e)}")
        return None


def get_working_workspace(path: str) -> Optional[Workspace]:
    """
    The session's own copy of a workspace

    Commands register new objects, so the shared cached parse is never
    handed out directly.
    """
    copies: Dict[str, Workspace] = st.session_state.setdefault(SESSION_KEY, {})
    if path not in copies:
        cached = get_cached_workspace(path)
        if cached is None:
            return None
        copies[path] = parse_workspace(serialize_workspace(cached))
    return copies[path]


def reset_working_workspace(path: str):
    st.session_state.setdefault(SESSION_KEY, {}).pop(path, None)


def clear_all_caches():
    """
    Clear all Streamlit caches to force fresh loading
    """
    try:
        st.cache_data.clear()
        st.cache_resource.clear()
        st.session_state.pop(SESSION_KEY, None)
        logger.info("All caches cleared successfully")
    except Exception as e:
        logger.error(f"Failed to clear caches: {str(e)}")
