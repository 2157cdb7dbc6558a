"""
Setup script for Phase Annihilator
"""

from pathlib import Path

from setuptools import find_packages, setup

here = Path(__file__).parent
requirements = [
    line.strip()
    for line in (here / "requirements.txt").read_text().splitlines()
    if line.strip() and not line.startswith("#")
]

setup(
    name="phase-annihilator",
    version="0.1.0",
    description="Smooth circle-valued functions annihilating linear and odd functionals, with W1,1 bounds",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={
        "dev": ["pytest>=7.0.0", "pytest-cov>=4.0.0", "black>=23.0.0", "flake8>=6.0.0", "isort>=5.12.0"],
    },
    entry_points={
        "console_scripts": [
            "phase-annihilator=phase_annihilator.cli:main",
        ],
    },
)
