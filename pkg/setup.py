from setuptools import setup, find_packages

setup(
    name='hyplan',
    version='1.0',
    packages=find_packages("src"),
    python_requires=">=3.10",
    install_requires=[
        "matplotlib==3.7.1",
        "numpy==1.24.2",
        "pandas==1.5.3",
        "PuLP==2.7.0",
        "pydantic==1.10.5",
        "PyYAML==6.0",
        "scipy==1.10.1",
        "tabulate==0.9.0",
    ],
    package_dir={"": "src"},
    entry_points={
        'console_scripts': [
            'hyplan=hyplan.scripts.run_hyplan:main',
        ],
    },
    package_data = {"hyplan": ["data/*.yaml"]},
)
