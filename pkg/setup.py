#!/usr/bin/env python3

from setuptools import setup
import json

pkg = json.load(open('package.json', 'r'))


setup(
  name = pkg['name'],
  version = pkg['version'],
  description = 'Closed geodesics by Birkhoff curve shortening',
  long_description = open('README.md', 'rt').read(),
  long_description_content_type = 'text/markdown',
  platforms = ['any'],
  license = pkg['license'],
  package_dir = {'': 'src/py'},
  packages = ['geoshort'],
  package_data = {'geoshort': ['scenario-template.json']},
  include_package_data = True,
  entry_points = {
    'console_scripts': [
      'geoshort = geoshort:run'
    ]
  },
  python_requires = '>=3.8',
  install_requires = 'numpy scipy sympy matplotlib'.split(),
  extras_require = {'test': ['pytest']},
  zip_safe = False,
)
