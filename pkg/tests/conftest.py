"""Anchors pytest's rootdir so helper modules in this directory import."""
