"""Command-line harness: data ingestion, fit/sample/diagnose commands and the simulation study."""
