"""Language names every release must support, as a data table."""

# Input and output languages listed for the default service
LISTED_LANGUAGES = [
    "Amharic", "Arabic", "Basque", "Bengali", "English (UK)", "Portuguese (Brazil)", "Bulgarian",
    "Catalan", "Cherokee", "Croatian", "Czech", "Danish", "Dutch", "English (US)", "Estonian",
    "Filipino", "Finnish", "French", "German", "Greek", "Gujarati", "Hebrew", "Hindi", "Hungarian",
    "Icelandic", "Indonesian", "Italian", "Japanese", "Kannada", "Korean", "Latvian", "Lithuanian",
    "Malay", "Malayalam", "Marathi", "Norwegian", "Polish", "Portuguese (Portugal)", "Romanian",
    "Russian", "Serbian", "Chinese (Simplified)", "Slovak", "Slovenian", "Spanish", "Swahili",
    "Swedish", "Tamil", "Telugu", "Thai", "Chinese (Traditional)", "Turkish", "Urdu", "Ukrainian",
    "Vietnamese", "Welsh",
]
