# wisig setup.py

import wisig
from setuptools import setup

setup(
    name             = 'wisig',
    version          = wisig.__version__,
    description      = 'Writer-independent offline signature verification',
    long_description = 'A dichotomy transformation, CNN prototype selection, an RBF SVM '
                       'dichotomizer and kDN instance hardness analysis for writer-independent '
                       'signature verification in the dissimilarity space.',
    author           = 'The wisig developers',
    license          = 'MIT',
    packages         = ['wisig'],
    keywords         = ['signature', 'verification', 'biometrics', 'svm', 'dissimilarity',
                        'instance hardness', 'prototype selection'],
    classifiers      = [
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Scientific/Engineering :: Image Recognition',
    ],
    python_requires  = '>=3.6',
    install_requires = [ 'setuptools', 'six', 'numpy>=1.17', 'scipy' ],
    entry_points     = {
        'console_scripts': [ 'wisig = wisig.cli:main' ],
    },
)

# vim:expandtab
