import pathlib

from setuptools import find_packages, setup

HERE = pathlib.Path(__file__).parent

version = "0.1.0"


setup(
    name="switched-limits",
    version=version,
    description="""Limit sets and stability certificates of switched linear systems""",
    long_description=(HERE / "README.md").read_text(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    include_package_data=True,
    zip_safe=False,
    keywords="switched systems,stability,lyapunov,omega-limit,control,numpy",
    license="BSD",
    install_requires=[
        "numpy>=1.17",
        "scipy>=1.4",
        "marshmallow>=3.10,<4",
    ],
    entry_points={"console_scripts": ["switched-limits=switched_limits.cli:main"]},
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
    ],
    python_requires=">=3.7",
)
