"""Simulation toolkit for SPDC pumped by structured light.

Modules:

* ``specialfn``  Bessel J and I (scaled), sinc, log-factorial
* ``modes``      Gaussian, NOV, Bessel-Gauss and perfect-vortex beams, SLM holograms
* ``fieldgrid``  sampled fields, Fourier lens, spiral phase plate, axicon, ring analysis
* ``spdc``       phase matching, biphoton amplitude, signal angular spectrum
* ``projection`` fiber coincidences, OAM spectra, Schmidt number, Bell states
* ``cli``        the ``twistlab`` command
"""

__version__ = "0.1.0"
