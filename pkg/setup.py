#!/usr/bin/env python

from setuptools import setup
from npmc import VERSION

try:
    readme = open("README.rst")
    long_description = str(readme.read())
finally:
    readme.close()

setup(
    name="npmc",
    version=VERSION,
    description="Nonlinear population Monte Carlo inference for a stochastic "
        "coupled-repressilator gene network",
    long_description=long_description,
    author="The npmc contributors",
    python_requires="~=3.8",
    install_requires=[
        "numpy>=1.20",
        "scipy>=1.6",
        "pandas>=1.2",
        "joblib>=1.0",
    ],
    extras_require={
        "plot": ["matplotlib>=3.3"],
    },
    test_requires=[
        "pytest>=2",
        "pytest-mock",
    ],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Operating System :: POSIX",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Bio-Informatics",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    packages=["npmc"],
    entry_points={
        "console_scripts": ["npmc = npmc.run:main"],
    },
)
