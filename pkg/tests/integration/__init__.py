"""
Integration tests for FlowRAG.
Tests the complete pipeline with real databases.
"""
