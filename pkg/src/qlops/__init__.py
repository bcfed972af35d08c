"""QLOPS resource estimation toolkit."""
