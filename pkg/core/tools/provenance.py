import functools
import os
import subprocess

# GitPython refuses to import without a git executable unless told to stay quiet
os.environ.setdefault("GIT_PYTHON_REFRESH", "quiet")
import git  # noqa: E402


def _run_git(*args) -> str:
    return subprocess.check_output(["git", *args], stderr=subprocess.DEVNULL).decode("ascii").strip()


def get_git_revision_hash() -> str:
    return _run_git("rev-parse", "HEAD")


def get_git_tag() -> str:
    return _run_git("describe", "--tags", "--abbrev=0")


def get_git_branch() -> str:
    return _run_git("rev-parse", "--abbrev-ref", "HEAD")


def _from_subprocess():
    info = {}
    for key, getter in (
        ("Commit_Hash", get_git_revision_hash),
        ("Branch_Name", get_git_branch),
        ("Code_Release", get_git_tag),
    ):
        try:
            info[key] = getter()
        except (OSError, subprocess.CalledProcessError):
            info[key] = ""
    return info


@functools.lru_cache(maxsize=1)
def git_info() -> dict:
    """Version control information for receipts.

    Returns:
        dict: Code_Release, Commit_Hash and Branch_Name; empty strings outside a
        repository or without a git executable.
    """
    try:
        repo = git.Repo(search_parent_directories=True)
    except (git.exc.InvalidGitRepositoryError, git.exc.NoSuchPathError):
        return {"Code_Release": "", "Commit_Hash": "", "Branch_Name": ""}
    except Exception:  # GitCommandNotFound and friends when git is absent
        return _from_subprocess()
    try:
        return {
            "Code_Release": str(repo.tags[-1]) if repo.tags else "",
            "Commit_Hash": repo.head.object.hexsha,
            "Branch_Name": repo.active_branch.name,
        }
    except (TypeError, ValueError, BrokenPipeError):
        # detached heads, empty repositories and containers
        return _from_subprocess()
