"""Newsbot - robot sports reporter: match report generation, summarization, translation and lip-sync"""
__version__ = "1.0.0"
