"""Setup script for labourflow."""

from setuptools import setup, find_packages

setup(
    name="labourflow",
    version="1.0.0",
    description="Regional Occupational Mobility Network and Labour Market Simulator",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["test", "test.*", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.22",
        "pandas>=1.5.0",
        "networkx>=2.8",
        "scipy>=1.9",
        "PyYAML>=6.0",
        "tqdm>=4.64.0"
    ],
    extras_require={
        'test': ['pytest>=7.0'],
    },
    entry_points={
        "console_scripts": [
            "labourflow=labourflow.main:main",
        ],
    },
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
)
