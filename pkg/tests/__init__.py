"""Test package for polydeploy."""
