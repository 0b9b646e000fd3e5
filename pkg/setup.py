# The MIT License (MIT)
# Copyright © 2024 varpomdp developers

import re
import os
from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))

# Needed only to run the test suite.
TEST_REQUIREMENTS = {"pytest"}


def read_requirements(filename):
    """Splits requirements.txt into runtime and test pins, skipping comments."""
    runtime, tests = [], []
    with open(os.path.join(here, filename), "r") as f:
        for line in f:
            req = line.split("#", 1)[0].strip()
            if not req:
                continue
            name = re.split(r"[<>=!~\[; ]", req, maxsplit=1)[0].lower()
            (tests if name in TEST_REQUIREMENTS else runtime).append(req)
    return runtime, tests


def read_version():
    with open(os.path.join(here, "varpomdp", "__init__.py"), encoding="utf-8") as f:
        match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]", f.read(), re.M)
    if match is None:
        raise RuntimeError("varpomdp/__init__.py does not define __version__")
    return match.group(1)


requirements, test_requirements = read_requirements("requirements.txt")

with open(os.path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="varpomdp",
    version=read_version(),
    description="Learn VAR-POMDPs from time series and check bounded-until PCTL formulas at a belief",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="varpomdp developers",
    license="MIT",
    packages=find_packages(include=["varpomdp", "varpomdp.*"]),
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={"test": test_requirements},
    entry_points={"console_scripts": ["varpomdp = varpomdp.cli:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
)
