"""Data models for events, articles, translation, phonemes and lip-sync"""
