"""
Derived Chronicles - Main Application Module

This is the main entry point for the Derived Chronicles dashboard. It
handles navigation and page routing for browsing workspaces, running
commands against them and exploring the worked examples.
"""
# app.py

import logging
import os

import streamlit as st
from streamlit_option_menu import option_menu

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

st.set_page_config(
    page_title="Derived Chronicles",
    page_icon="🧮",
    layout="wide",
    initial_sidebar_state="expanded"
)

os.makedirs("data", exist_ok=True)


@st.cache_resource
def initialize_app():
    """Write the example workspaces into data/ the first time the app starts"""
    from utils.cache_manager import list_workspace_files

    if not list_workspace_files():
        try:
            from sample_data import create_sample_data
            create_sample_data()
        except Exception as e:
            logger.error(f"Failed to write sample workspaces: {str(e)}")
    return True


initialize_app()


def main():
    """
    Main application function that handles navigation and page routing.
    """
    st.markdown("""
    <style>
    .main-header {
        background: linear-gradient(90deg, #2E4057 0%, #048BA8 100%);
        padding: 1rem;
        border-radius: 10px;
        margin-bottom: 2rem;
        text-align: center;
        color: white;
    }
    .feature-card {
        background: linear-gradient(135deg, #16DB93 0%, #048BA8 100%);
        padding: 1rem;
        border-radius: 10px;
        color: white;
        margin: 0.5rem 0;
    }
    .section-header {
        background: linear-gradient(90deg, #2E4057 0%, #048BA8 100%);
        padding: 0.8rem;
        border-radius: 8px;
        color: white;
        margin: 1rem 0;
        text-align: center;
        font-weight: bold;
    }
    </style>
    """, unsafe_allow_html=True)

    st.markdown('<div class="main-header"><h1>🧮 Derived Chronicles</h1>'
                '<p>Exact complexes, dg algebras and derived equivalences</p></div>', unsafe_allow_html=True)

    with st.sidebar:
        st.markdown("### Navigation")
        selected = option_menu(
            "Workbench",
            ["Home", "Run Command", "Browse Workspace", "Examples"],
            icons=["house", "terminal", "table", "journal-code"],
            menu_icon="calculator",
            default_index=0,
            styles={
                "container": {"padding": "5!important", "background-color": "#fafafa"},
                "icon": {"color": "#048BA8", "font-size": "20px"},
                "nav-link": {"font-size": "16px", "text-align": "left", "margin": "0px", "--hover-color": "#eee"},
                "nav-link-selected": {"background-color": "#048BA8"},
            }
        )
        if st.button("Reload workspaces", help="Re-read workspace files edited on disk"):
            from utils.cache_manager import clear_all_caches
            clear_all_caches()
            st.rerun()

    if selected == "Home":
        show_home()
    elif selected == "Run Command":
        from pages.run_command import show_run_command
        show_run_command()
    elif selected == "Browse Workspace":
        from pages.browse_workspace import show_browse_workspace
        show_browse_workspace()
    elif selected == "Examples":
        show_examples()


def show_home():
    st.markdown('<div class="feature-card"><h2>Welcome</h2></div>', unsafe_allow_html=True)
    col1, col2 = st.columns([2, 1])

    with col1:
        st.markdown("""
        <div class="feature-card">
        <h3>What it does</h3>
        <ul>
        <li>Bounded complexes of modules over finite-dimensional algebras, in exact arithmetic</li>
        <li>Hom complexes, homotopy classes, cones and approximations by shifts of a complex</li>
        <li>Endomorphism dg algebras, cohomology rings and quasi-isomorphism verdicts</li>
        <li>The mutation pipeline with its quasi-balanced bimodule certificates</li>
        </ul>
        </div>
        """, unsafe_allow_html=True)

    with col2:
        from utils.cache_manager import list_workspace_files
        files = list_workspace_files()
        st.metric("Workspaces in data/", len(files))
        for path in files:
            st.caption(os.path.basename(path))


def show_examples():
    from utils.cache_manager import get_cached_example

    st.markdown('<div class="section-header"><h2>Worked examples</h2></div>', unsafe_allow_html=True)
    which = st.selectbox("Example", ["two-loop", "nakayama", "apr-tilt"])
    col1, col2 = st.columns(2)
    first, second = 0, 0
    if which == "two-loop":
        first = col1.number_input("n", min_value=2, max_value=5, value=2)
        second = col2.number_input("s", min_value=2, max_value=5, value=2)
    elif which == "nakayama":
        first = col1.number_input("n", min_value=2, max_value=6, value=3)
        second = col2.number_input("r", min_value=1, max_value=first - 1, value=1)

    with st.spinner("Building example..."):
        ws = get_cached_example(which, int(first), int(second))
    if ws is None:
        st.error("❌ The example could not be built for these parameters")
        return
    checks = ws.checks
    failed = [k for k, v in checks.items() if v is False]
    if failed:
        st.error(f"Failed checks: {', '.join(failed)}")
    else:
        st.success("All checks pass")
    st.json(checks)
    st.dataframe(ws.summary(), use_container_width=True, hide_index=True)


if __name__ == "__main__":
    main()
