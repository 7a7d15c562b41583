"""Infrastructure of Derived Chronicles: exact linear algebra, errors, workspaces, reports and commands"""
