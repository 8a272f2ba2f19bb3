"""Newsbot services: generation, summarization, translation, speech and pipeline"""
