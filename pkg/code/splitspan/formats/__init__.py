"""Input parsing and output rendering."""
