"""Where build artifacts live on disk."""

import os
import os.path


def artifact_dir(base, stamp):
    folder = os.path.join(base, stamp)
    if not os.path.isdir(folder):
        os.makedirs(folder)
    return folder


def newest_file(folder):
    names = os.listdir(folder)
    paths = [os.path.join(folder, n) for n in names]
    paths.sort(key=os.path.getmtime)
    last = paths[-1]
    return last


def relative(path, base):
    rel = os.path.relpath(path, base)
    parts = rel.split(os.sep)
    depth = len(parts)
    return rel, depth


def ensure_ext(path, ext):
    if path.endswith(ext):
        return path
    return path + ext
