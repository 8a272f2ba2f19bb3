"""API route handlers for news and pipeline runs"""
