from setuptools import find_packages, setup

install_requires = [
	"numpy",
	"scipy",
	"frozendict",
	# Libraries used for testing
	"pytest",
]


setup(
	name="entmap",
	install_requires=install_requires,
	version="0.1",
	scripts=[],
	packages=find_packages(exclude=["autograding_tests"]),
	package_data={"entmap": ["data/*.json"]},
	entry_points={"console_scripts": ["entmap=entmap.cli.main:main"]},
)
