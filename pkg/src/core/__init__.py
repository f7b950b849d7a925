"""Shared configuration, error types and data models."""
