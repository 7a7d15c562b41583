"""
Run Command Page - Derived Chronicles

This module handles the command form: pick a workspace, a command and its
key=value arguments, then show the report as text and tables.
"""

import os

import streamlit as st

from utils.cache_manager import get_working_workspace, list_workspace_files, reset_working_workspace
from utils.commands import COMMANDS, parse_args, parse_window, run_command
from utils.errors import ChroniclesError
from utils.reports import STRUCTURED, TEXT, emit_report


def show_run_command():
    """Display the command runner"""

    st.markdown('<div class="section-header"><h2>Run a command</h2></div>', unsafe_allow_html=True)

    files = list_workspace_files()
    if not files:
        st.info("No workspaces in data/. Run `python sample_data.py` to write the examples.")
        return

    col1, col2 = st.columns([2, 1])
    with col1:
        path = st.selectbox("Workspace", files, format_func=os.path.basename)
    with col2:
        if st.button("Reset workspace", use_container_width=True):
            reset_working_workspace(path)
            st.rerun()

    ws = get_working_workspace(path)
    if ws is None:
        st.error("❌ The workspace failed to load; see the log for the failing line")
        return

    col1, col2, col3 = st.columns([2, 3, 1])
    with col1:
        name = st.selectbox("Command", sorted(COMMANDS))
    with col2:
        raw_args = st.text_input("Arguments", placeholder="X=T2 M=T1 window=-3..3")
    with col3:
        window_text = st.text_input("Window", value="-3..3")

    fmt = st.radio("Report format", [TEXT, STRUCTURED], horizontal=True)

    if st.button("Run", type="primary"):
        try:
            with st.spinner(f"Running {name}..."):
                report = run_command(ws, name, parse_args(raw_args.split()), parse_window(window_text))
        except ChroniclesError as e:
            st.error(f"❌ {name} failed: {str(e)}")
            return

        if report.verdict is True:
            st.success("✅ PASS")
        elif report.verdict is False:
            st.error("FAIL")

        st.code(emit_report(report, fmt), language="json" if fmt == STRUCTURED else None)
        for table in sorted(report.tables):
            st.markdown(f"**{table}**")
            st.dataframe(report.table(table), use_container_width=True, hide_index=True)
