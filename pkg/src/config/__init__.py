"""Settings and run configuration"""
