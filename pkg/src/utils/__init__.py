"""Utility modules for the newsbot pipeline"""
