"""Core system components and configuration."""
