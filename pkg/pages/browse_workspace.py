"""
Browse Workspace Page - Derived Chronicles

This module handles the registry browser: the objects of a workspace with
kind filters, and a detail view per object.
"""

import os

import pandas as pd
import streamlit as st

from utils.cache_manager import get_cached_summary, get_working_workspace, list_workspace_files


def _complex_table(X):
    return pd.DataFrame([{"degree": i, "dim": X.dim(i)} for i in X.degrees])


def show_browse_workspace():
    """Display the objects of one workspace"""

    st.markdown('<div class="section-header"><h2>Browse a workspace</h2></div>', unsafe_allow_html=True)

    files = list_workspace_files()
    if not files:
        st.info("📭 No workspaces found in data/.")
        return

    path = st.selectbox("Workspace", files, format_func=os.path.basename)
    summary = get_cached_summary(path)
    if summary.empty:
        st.warning("This workspace is empty or failed to load.")
        return

    kinds = ["All"] + sorted(summary["kind"].unique().tolist())
    selected_kind = st.selectbox("Kind", kinds)
    shown = summary if selected_kind == "All" else summary[summary["kind"] == selected_kind]
    st.dataframe(shown, use_container_width=True, hide_index=True)

    ws = get_working_workspace(path)
    if ws is None:
        return
    name = st.selectbox("Details for", shown["name"].tolist())
    if not name:
        return
    kind = ws.kind_of(name)
    value = ws.get(name)

    with st.expander(f"{kind} {name}", expanded=True):
        if kind == "algebra":
            st.write(f"Dimension {value.dim} over {value.field}")
            st.write(", ".join(value.labels))
        elif kind in ("complex", "bicomplex"):
            st.dataframe(_complex_table(value), hide_index=True)
        elif kind == "map":
            st.write(f"Degree {value.degree}; chain map: {value.is_chain_map()}")
        elif kind == "dg":
            st.dataframe(pd.DataFrame([{"degree": n, "dim": value.dim(n),
                                        "cohomology": value.space.homology(n).dim} for n in value.degrees]),
                         hide_index=True)
        elif kind == "report":
            st.json(value)
        else:
            st.write(f"Dimension {value.dim}")
    if ws.checks:
        st.markdown("**Recorded checks**")
        st.json(ws.checks)
