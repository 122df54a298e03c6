"""Conditioning of two-point flux finite volume matrices on quadtree meshes."""
