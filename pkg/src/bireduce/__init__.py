"""Reduction of biharmonicity to ODEs for symmetric maps and hypersurfaces."""

__version__ = "0.1.0"
